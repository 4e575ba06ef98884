import java.util.HashMap;
import java.util.Map;

public class TwoSum {
    public static int main(String[] args) {
        int[] nums = {2, 7, 11, 15};
        int target = 9;
        Map<Integer, Integer> seen = new HashMap<>();
        int answer = -1;
        for (int i = 0; i < nums.length; i++) {
            int need = target - nums[i];
            if (seen.containsKey(need)) {
                answer = seen.get(need) * 10 + i;
                break;
            }
            seen.put(nums[i], i);
        }
        return answer;
    }
}
