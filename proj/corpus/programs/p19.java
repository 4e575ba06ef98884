public class MajorityElement {
    public static int main(String[] args) {
        int[] nums = {2, 2, 1, 1, 1, 2, 2};
        int candidate = 0;
        int count = 0;
        for (int num : nums) {
            if (count == 0) {
                candidate = num;
            }
            count += (num == candidate) ? 1 : -1;
        }
        int verify = 0;
        for (int num : nums) {
            if (num == candidate) {
                verify++;
            }
        }
        if (verify * 2 <= nums.length) {
            candidate = -1;
        }
        return candidate;
    }
}
