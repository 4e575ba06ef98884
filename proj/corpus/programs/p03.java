import java.util.ArrayList;
import java.util.List;

public class ListSize {
    public static int main(String[] args) {
        List<Integer> numbers = new ArrayList<>();
        int total = 0;
        for (int k = 1; k <= 4; k++) {
            numbers.add(k * k);
            total += k;
        }
        numbers.remove(0);
        int size = numbers.size();
        return size;
    }
}
